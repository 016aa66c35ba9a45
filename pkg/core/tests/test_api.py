"""
Tests for the script run and expression parse endpoints.
"""

from django.urls import reverse
from rest_framework import status
from rest_framework.test import APIClient, APITestCase

from core.models import ScriptRun


class ScriptRunAPITests(APITestCase):

    def setUp(self):
        self.client = APIClient()
        self.url = reverse('runs-list')

    def test_run_stores_report(self):
        script = 'vars x y; let f = x^3/(x^2+y^2); resolve f; flatcheck f k=0;'
        response = self.client.post(self.url, {'script': script}, format='json')
        self.assertEqual(response.status_code, status.HTTP_201_CREATED)
        self.assertEqual(response.data['command_count'], 2)
        self.assertEqual(response.data['status'], 'pass')
        self.assertEqual(response.data['exit_code'], 0)
        self.assertEqual(ScriptRun.objects.count(), 1)

    def test_failing_run_is_stored(self):
        script = 'vars x y; let f = x^3/(x^2+y^2); flatcheck f k=1;'
        response = self.client.post(self.url, {'script': script, 'seed': 3}, format='json')
        self.assertEqual(response.status_code, status.HTTP_201_CREATED)
        self.assertEqual(response.data['status'], 'fail')
        self.assertEqual(response.data['exit_code'], 1)
        self.assertEqual(response.data['seed'], 3)

    def test_parse_error_position(self):
        response = self.client.post(self.url, {'script': 'vars x y;\nlet f = x^;'}, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertEqual((response.data['line'], response.data['column']), (2, 11))
        self.assertEqual(ScriptRun.objects.count(), 0)

    def test_missing_script(self):
        response = self.client.post(self.url, {}, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_list_and_detail(self):
        self.client.post(self.url, {'script': 'vars x y; let f = x^2+y^2; resolve f;'}, format='json')
        listing = self.client.get(self.url)
        self.assertEqual(listing.status_code, status.HTTP_200_OK)
        self.assertEqual(listing.data['count'], 1)

        run = ScriptRun.objects.get()
        detail = self.client.get(reverse('runs-detail', args=[run.id]))
        self.assertEqual(detail.data['digest'], run.digest)
        self.assertEqual(detail.data['report']['commands'][0]['verb'], 'resolve')


class ExpressionParseAPITests(APITestCase):

    def setUp(self):
        self.client = APIClient()
        self.url = reverse('parse')

    def test_canonical_form(self):
        response = self.client.post(self.url, {'expression': '(x+y)^2 - x^2 - 2*x*y'}, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['canonical'], 'y^2')
        self.assertEqual(response.data['vars'], ['x', 'y'])

    def test_reduced_quotient(self):
        response = self.client.post(self.url, {'expression': 'x/(-2*y)'}, format='json')
        self.assertEqual(response.data['canonical'], '-1/2*x/y')
        self.assertEqual(response.data['denominator'], 'y')

    def test_zero_denominator(self):
        response = self.client.post(self.url, {'expression': 'x/(y-y)'}, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertEqual(response.data['error'], 'ParseError')

    def test_invalid_variable_name(self):
        response = self.client.post(self.url, {'expression': 'x', 'vars': ['1x']}, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
